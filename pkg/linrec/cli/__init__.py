"""Command handlers and report schemas for the `linrec` command line."""
