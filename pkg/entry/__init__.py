"""Loop TAD entry package."""
