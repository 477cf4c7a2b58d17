# Dense linear-algebra kernels
