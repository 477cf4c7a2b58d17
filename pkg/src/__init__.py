# Riemannian Armijo Bench
