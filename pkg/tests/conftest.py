def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long-running statistical checks (minutes-scale)"
    )
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance criteria (very slow)"
    )
