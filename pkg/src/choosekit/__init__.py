"""List colouring and (a,b)-choosability tools for small graphs."""
