"""K-surfaces in AdS3 from landslides of the hyperbolic plane."""
