# Generators package 