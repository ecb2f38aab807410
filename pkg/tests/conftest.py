import os

import pytest
from hypothesis import HealthCheck, settings

from sumset_orders import _kernels

settings.register_profile("repo", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture(params=[k.name for k in _kernels.backends()])
def kernels(request):
    """Each available kernel backend in turn."""
    return _kernels.get(request.param)
