# Physics package
