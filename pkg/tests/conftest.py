import pytest

from carp.classify import train_knn
from carp.dataset import load_training_dir
from carp.synth import make_training_dir


@pytest.fixture(scope="session")
def training_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus") / "train"
    make_training_dir(out, seed=0)
    return out


@pytest.fixture(scope="session")
def model(training_dir):
    patches = load_training_dir(training_dir)
    return train_knn([(p.patch, p.label) for p in patches], k=3)
