# Predictors package
