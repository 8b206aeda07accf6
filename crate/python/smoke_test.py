#!/usr/bin/env python3
"""Import smoke test for the logbath_py extension module.

Builds nothing itself: run `cargo build -p logbath-py` (optionally
--release) first, then `python3 python/smoke_test.py`. The script copies
the built cdylib next to a temp dir under the import name Python expects
and checks a few exact values.
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_cdylib() -> pathlib.Path:
    candidates = [
        ROOT / "target" / "release" / "liblogbath_py.so",
        ROOT / "target" / "debug" / "liblogbath_py.so",
        ROOT / "target" / "release" / "logbath_py.dll",
        ROOT / "target" / "debug" / "logbath_py.dll",
        ROOT / "target" / "release" / "liblogbath_py.dylib",
        ROOT / "target" / "debug" / "liblogbath_py.dylib",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("no built module found; run `cargo build -p logbath-py` first")


def main() -> None:
    lib = locate_cdylib()
    with tempfile.TemporaryDirectory() as tmp:
        target = pathlib.Path(tmp) / ("logbath_py" + (".pyd" if lib.suffix == ".dll" else ".so"))
        shutil.copyfile(lib, target)
        sys.path.insert(0, tmp)
        import logbath_py

        sd = logbath_py.SpectralDensity.int_log(1.0, 1.0, 1.0, 0)
        assert sd.kind == "int-log", sd.kind
        assert sd.alpha0 == 1.0
        assert math.isinf(sd.chi0)

        # Closed form: xi1(1) = 0, xi2(1) = 1/2.
        ((tau, xi1, xi2, err1, err2),) = sd.bcf([1.0])
        assert tau == 1.0
        assert abs(xi1) < 1e-9, xi1
        assert abs(xi2 - 0.5) < 1e-9, xi2
        assert err1 < 1e-8 and err2 < 1e-8
        print(f"bcf(1) = ({xi1:.3e}, {xi2:.16f})  ok")

        m1 = sd.moment(1)
        assert abs(m1 - 2.0) < 1e-10, m1
        print(f"moment(1) = {m1:.12f}  ok")

        b = sd.branch("c2")
        assert b["power"] == 3.0, b
        assert b["prefactor"] == 2.0, b
        assert b["law"] == "cascaded-generic", b
        print(f"branch(c2): tau^-{b['power']:g} prefactor {b['prefactor']:g}  ok")

        # Errors surface as ValueError.
        try:
            logbath_py.SpectralDensity.int_log(1.0, -1.0, 1.0, 0)
        except ValueError as e:
            print(f"domain error propagates: {e}")
        else:
            sys.exit("expected ValueError for alpha <= 0")

    print("smoke test passed")


if __name__ == "__main__":
    main()
