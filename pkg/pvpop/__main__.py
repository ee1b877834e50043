"""Entry point for `python -m pvpop` and the `pvpop` console script."""

import sys

from pvpop import __version__


def _smoke_test() -> None:
    """Run a quick numeric self-check, then exit."""
    errors: list[str] = []

    # 1. Critical imports
    try:
        import numpy  # noqa: F401
    except ImportError as e:
        errors.append(f"numpy import failed: {e}")
    try:
        import scipy.special  # noqa: F401
    except ImportError as e:
        errors.append(f"scipy import failed: {e}")
    try:
        import yaml  # noqa: F401
    except ImportError as e:
        errors.append(f"PyYAML import failed: {e}")

    # 2. Kernels
    try:
        from pvpop.kernels import gauss_legendre, std_normal_cdf

        if abs(std_normal_cdf(0.0) - 0.5) > 1e-15:
            errors.append("std_normal_cdf(0) != 0.5")
        area = gauss_legendre(8).integrate(lambda x: x * x)
        if abs(area - 2.0 / 3.0) > 1e-12:
            errors.append(f"gauss_legendre(8) integrates x^2 to {area!r}")
    except Exception as e:
        errors.append(f"kernels failed: {e}")

    # 3. A tiny exact enumeration
    try:
        from pvpop.design import DesignSpec, exact_error_rates

        design = DesignSpec(alpha=0.1, target_power=0.8, p_S=0.2, p_E_alt=0.3, n=5)
        for rule in ("frequentist", "bayesian"):
            exact_error_rates(design, rule)
    except Exception as e:
        errors.append(f"enumeration failed: {e}")

    # 4. Core configuration
    try:
        from pvpop.config import RunConfig

        RunConfig().snapshot()
    except Exception as e:
        errors.append(f"RunConfig failed: {e}")

    # 5. Report result
    if errors:
        print("SMOKE TEST FAILED:", file=sys.stderr)
        for err in errors:
            print(f"  - {err}", file=sys.stderr)
        sys.exit(1)

    print(f"pvpop {__version__}")
    sys.exit(0)


def main():
    if "--smoke-test" in sys.argv:
        _smoke_test()

    from pvpop.cli import main as cli_main

    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
