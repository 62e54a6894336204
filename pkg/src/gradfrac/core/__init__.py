"""Settings, logging and errors shared by every layer."""
