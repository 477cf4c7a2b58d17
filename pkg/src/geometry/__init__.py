# Manifolds in ambient coordinates
