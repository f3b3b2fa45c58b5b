import os

import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CROSSKIT_SLOW"):
        return
    skip = pytest.mark.skip(reason="extended check; set CROSSKIT_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
