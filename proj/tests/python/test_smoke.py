def test_import():
    import fdeopt  # noqa: F401
