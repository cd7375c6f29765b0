import pytest

from advflow import experiment, nn
from advflow.data import synthetic_schema

# desk-scale benchmark: 2,000 separable rows, seed 42
BENCH_SEED = 42
BENCH_TRAIN = dict(epochs=60, batch_size=64, learning_rate=0.1)


def benchmark_config():
    source = experiment.DataSource(
        kind="synthetic", schema=synthetic_schema(10),
        n_normal=1000, n_attack=1000, separation=6.0,
    )
    return experiment.SweepConfig(
        source=source, seed=BENCH_SEED, train=nn.TrainConfig(**BENCH_TRAIN),
    )


@pytest.fixture(scope="session")
def bench_cfg():
    return benchmark_config()


@pytest.fixture(scope="session")
def bench_ctx(bench_cfg):
    return experiment.prepare(bench_cfg)
