# Time series package
