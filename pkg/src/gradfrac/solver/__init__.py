"""Assembly, sparse solves and the staggered load-stepping scheme."""
