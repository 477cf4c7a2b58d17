# Objective functions and seeded instances
