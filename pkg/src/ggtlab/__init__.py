"""Group-theory experiment toolkit."""
