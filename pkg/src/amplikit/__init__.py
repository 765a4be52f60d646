"""Exact BCFW cells, tiles and cluster data for the m=4 amplituhedron."""
