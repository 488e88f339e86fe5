"""Dataset sources: MindBigData recordings, item catalogs, synthetic data."""
