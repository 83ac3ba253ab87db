from importlib import resources

import pytest

from dialogkit import nlu, sampledata
from dialogkit.engine import Engine
from dialogkit.errors import ProviderError
from dialogkit.gateway import Gateway
from dialogkit.providers import MockProvider

FIXTURES_PATH = str(resources.files("dialogkit") / "data" / "banking_fixtures.yaml")


class StubProvider:
    """Scriptable provider for tests: responses keyed by template id, with an
    optional callable for dynamic behavior."""

    provider_id = "stub"

    def __init__(self, responses=None, fn=None, error=None):
        self.responses = responses or {}
        self.fn = fn
        self.error = error
        self.calls = []

    def complete(self, prompt, context, params, template_id):
        self.calls.append((template_id, prompt))
        if self.error is not None:
            raise self.error
        if self.fn is not None:
            return self.fn(template_id, prompt)
        if template_id in self.responses:
            value = self.responses[template_id]
            if isinstance(value, list):
                return value.pop(0)
            return value
        raise ProviderError(f"no stub response for {template_id}")


@pytest.fixture
def config():
    return sampledata.build_banking_project()


@pytest.fixture(scope="session")
def trained_model():
    return nlu.train(sampledata.build_banking_project())


@pytest.fixture
def mock_gateway():
    return Gateway(MockProvider(FIXTURES_PATH))


@pytest.fixture
def engine(config, mock_gateway):
    return Engine(config, mock_gateway)


@pytest.fixture
def stub_gateway_factory():
    def make(**kwargs):
        provider = StubProvider(**kwargs)
        return Gateway(provider), provider
    return make
