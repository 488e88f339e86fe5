"""Script to verify QUARK setup."""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))


def check_imports():
    """Check if all required modules can be imported."""
    print("Checking imports...")
    try:
        import numpy  # noqa: F401
        import scipy  # noqa: F401
        import PIL  # noqa: F401
        import tqdm  # noqa: F401
        import dotenv  # noqa: F401
        from core.config import Config  # noqa: F401
        from model.network import QuarkModel  # noqa: F401
        from training.trainer import Trainer  # noqa: F401
        from evaluation.protocol import evaluate  # noqa: F401
        from agents.train_agent import TrainAgent  # noqa: F401
        print("✓ All imports successful")
        return True
    except ImportError as e:
        print(f"✗ Import error: {e}")
        print("  Make sure you've installed dependencies: pip install -r requirements.txt")
        return False


def check_config():
    """Check configuration."""
    print("\nChecking configuration...")
    try:
        from core.config import Config, RunConfig

        issues = []
        config = RunConfig(synthetic="2x1")
        config.validate()
        output = Path(Config.OUTPUT_DIR)
        if output.exists() and not output.is_dir():
            issues.append(f"QUARK_OUTPUT_DIR ({output}) exists and is not a directory")
        if Config.WORKERS < 1:
            issues.append("QUARK_WORKERS must be >= 1")

        if issues:
            print("⚠ Configuration issues:")
            for issue in issues:
                print(f"  - {issue}")
            return False
        print(f"✓ Configuration looks good (output dir: {output}, seed: {Config.SEED})")
        return True
    except Exception as e:
        print(f"✗ Config check failed: {e}")
        return False


def check_forward_pass():
    """Run one forward pass on a tiny synthetic recording."""
    print("\nChecking forward pass...")
    try:
        from core.config import HyperParams
        from integrations.synthetic import generate_synthetic
        from model.network import QuarkModel
        from model.params import ModelParams, ParamLayout

        hyper = HyperParams(window=15, step=25, basis_size=15, c=2, depth=2, hidden=8, embedding_dim=8)
        recordings, _ = generate_synthetic(2, 1, hyper.embedding_dim, seed=0)
        layout = ParamLayout.for_recording(hyper, *recordings[0].signal.shape)
        model = QuarkModel(hyper, ModelParams.initialize(hyper, layout, seed=0))
        representation = model.represent(recordings[0])
        print(f"✓ Forward pass produced a {representation.shape[0]}-dim representation")
        return True
    except Exception as e:
        print(f"✗ Forward pass failed: {e}")
        return False


def main():
    """Run all verification checks."""
    print("QUARK Setup Verification")
    print("=" * 50)
    print()

    checks = [
        ("Imports", check_imports),
        ("Configuration", check_config),
        ("Forward Pass", check_forward_pass),
    ]

    results = []
    for name, check_func in checks:
        try:
            result = check_func()
            results.append((name, result))
        except Exception as e:
            print(f"✗ {name} check crashed: {e}")
            results.append((name, False))

    print("\n" + "=" * 50)
    print("Verification Summary")
    print("=" * 50)

    all_passed = True
    for name, result in results:
        status = "✓ PASS" if result else "✗ FAIL"
        print(f"{status}: {name}")
        if not result:
            all_passed = False

    print()
    if all_passed:
        print("🎉 All checks passed! QUARK is ready to use.")
        print("\nNext steps:")
        print("  1. Desk run: python scripts/quark.py train --synthetic 8x50 --preset desk --out runs/desk")
        print("  2. Evaluate: python scripts/quark.py eval --checkpoint runs/desk/checkpoint.qck --style")
        print("  3. Full smoke test: python scripts/e2e_test.py")
    else:
        print("⚠ Some checks failed. Please fix the issues above.")
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
