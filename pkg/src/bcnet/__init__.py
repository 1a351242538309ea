"""Betweenness-centrality network classifier."""
