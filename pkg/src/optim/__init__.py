# Line-searches and the Newton solver
