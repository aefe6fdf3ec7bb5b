"""tritur: tripartite Turán toolkit library."""
