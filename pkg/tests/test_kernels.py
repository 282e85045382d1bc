import os
import subprocess
import sys

import numpy as np
import pytest

from sqdmnp import kernels
from sqdmnp.dynamics import integrate, pack_parameters, rhs
from sqdmnp.model import DriveSpec, SystemParams, couplings_for

HAS_COMPILED = "compiled" in kernels.available_backends()
needs_compiled = pytest.mark.skipif(not HAS_COMPILED, reason="compiled extension not built")


def test_python_backend_always_available():
    assert "python" in kernels.available_backends()
    assert kernels.get_backend("python").NAME == "python"
    assert kernels.get_backend(None) is kernels.DEFAULT
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("mode", ["cw", "sech"])
def test_kernel_rhs_matches_reference(gold, backend, mode):
    p = SystemParams(omega1=2.49, mu2=1.7, R2=11.0, T2=0.5, tau1=0.6,
                     drive=DriveSpec(E0=0.41e6, mode=mode, omega=2.5))
    c = couplings_for(p, gold)
    pvec = pack_parameters(c, p)
    rng = np.random.default_rng(7)
    kern = kernels.get_backend(backend)
    for t in (0.0, 21.0, 30.0):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        ref = rhs(rho, t, c, p)
        got = np.asarray(kern.rhs(rho.reshape(16).copy(), t, pvec)).reshape(4, 4)
        assert np.max(np.abs(got - ref)) <= 1e-15 * max(1.0, np.max(np.abs(ref)))


@needs_compiled
@pytest.mark.parametrize("mode", ["cw", "sech"])
def test_backends_agree(gold, mode):
    p = SystemParams(drive=DriveSpec(E0=0.41e6, mode=mode))
    c = couplings_for(p, gold)
    a = integrate(p, c, (0.0, 40.0), backend="python")
    b = integrate(p, c, (0.0, 40.0), backend="compiled")
    assert a.n_steps == b.n_steps
    assert np.max(np.abs(a.states - b.states)) < 1e-12
    assert (a.backend, b.backend) == ("python", "compiled")


def _run(code, **env):
    full = dict(os.environ, **env)
    return subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=full, check=False)


def test_env_override_selects_python():
    r = _run("from sqdmnp import kernels; print(kernels.DEFAULT.NAME)", SQDMNP_BACKEND="python")
    assert r.returncode == 0, r.stderr
    assert r.stdout.strip() == "python"


def test_fallback_when_extension_missing():
    code = (
        "import sys\n"
        "class Block:\n"
        "    def find_spec(self, name, path=None, target=None):\n"
        "        if name == 'sqdmnp._kernels':\n"
        "            raise ImportError('blocked')\n"
        "sys.meta_path.insert(0, Block())\n"
        "from sqdmnp import kernels, SystemParams, DriveSpec, couplings_for, gold_table, integrate\n"
        "p = SystemParams(drive=DriveSpec(E0=0.41e6))\n"
        "t = integrate(p, couplings_for(p, gold_table()), (0.0, 5.0))\n"
        "print(kernels.available_backends(), t.backend)\n"
    )
    r = _run(code, SQDMNP_BACKEND="auto")
    assert r.returncode == 0, r.stderr
    assert r.stdout.strip() == "('python',) python"


def test_unavailable_backend_request_fails():
    code = (
        "import sys\n"
        "class Block:\n"
        "    def find_spec(self, name, path=None, target=None):\n"
        "        if name == 'sqdmnp._kernels':\n"
        "            raise ImportError('blocked')\n"
        "sys.meta_path.insert(0, Block())\n"
        "import sqdmnp\n"
    )
    r = _run(code, SQDMNP_BACKEND="compiled")
    assert r.returncode != 0
    assert "SQDMNP_BACKEND" in r.stderr
