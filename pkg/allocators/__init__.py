# Allocators package
