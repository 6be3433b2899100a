
import math

import pytest

from witten_lab.config import Config
from witten_lab.errors import ConfigError
from witten_lab.version import version

example_config = """
[model]
kind = torus
n = 32
l2 = 3.5

[field]
id = sum-cos

[solver]
k = 8
tol = 1e-10
"""

def write(tmp_path, text):
    path = tmp_path / "lab.ini"
    path.write_text(text)
    return str(path)

def test_defaults():

    c = Config()

    assert(c.get("model.kind") == "circle")
    assert(c.get("model.n") == 256)
    assert(c.get("model.l1") == 2 * math.pi)
    assert(c.get("solver.tol") == 1e-8)
    assert(c.get("oracle.mode") == "standard")
    assert(c.get("model.path") is None)
    assert(c.get("solver.lu_fill_limit") == 100_000_000)
    assert(c.get("foliation.grid") == "geom:0.05:0.01:25")

def test_load(tmp_path):

    c = Config(write(tmp_path, example_config))

    assert(c.get("model.kind") == "torus")
    assert(c.get("model.n") == 32)
    assert(c.get("model.l2") == 3.5)
    assert(c.get("solver.k") == 8)
    assert(c.get("solver.tol") == 1e-10)

    # n2 follows n unless set
    assert(c.get("model.n2") == 32)
    c.set("model.n2", 16)
    assert(c.get("model.n2") == 16)

def test_set():

    c = Config()

    c.set("solver.k", None)
    assert(c.get("solver.k") == 5)

    c.set("solver.k", "12")
    assert(c.get("solver.k") == 12)

    c.set("model.path", None, applyNone=True)
    assert(c.get("model.path") is None)

def test_errors(tmp_path):

    with pytest.raises(ConfigError):
        Config(write(tmp_path, "[model]\nsize = 3\n"))

    with pytest.raises(ConfigError):
        Config(write(tmp_path, "[mdl]\nn = 3\n"))

    with pytest.raises(ConfigError):
        Config(write(tmp_path, "[model]\nn = many\n"))

    with pytest.raises(ConfigError):
        Config(write(tmp_path, "[model]\nn = 3.5\n"))

    with pytest.raises(ConfigError) as e:
        Config().set("oracle.mode", "exact")
    assert(e.value.exit_code == 2)

    with pytest.raises(ConfigError):
        Config(str(tmp_path / "missing.ini"))

    with pytest.raises(ConfigError):
        Config().get("solver")

def test_write(tmp_path):

    c = Config(write(tmp_path, example_config))
    out = str(tmp_path / "out.ini")
    c.write(out)

    d = Config(out)
    assert(d.to_dict() == c.to_dict())

def test_metadata():

    m = Config(config={"field": {"id": "tilted", "epsilon": 0.1}}).metadata()

    assert(m["version"] == version)
    assert(m["config"]["field"]["id"] == "tilted")
    assert(m["config"]["field"]["epsilon"] == 0.1)
