"""EEG preprocessing, quantum state machinery, adjacency graphs and the GCN model."""
