#!/usr/bin/env python3
"""End-to-end smoke test for QUARK on a small synthetic dataset."""
import sys
import tempfile
import time
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.logger import setup_logger
from scripts.quark import main as quark

logger = setup_logger(__name__)

COMMON = ["--synthetic", "4x20", "--preset", "desk", "--seed", "3", "--log-level", "WARNING"]


def print_step(step_num: int, description: str):
    """Print a test step header."""
    print("\n" + "=" * 70)
    print(f"STEP {step_num}: {description}")
    print("=" * 70)


def run_quark(step: int, description: str, argv) -> bool:
    print_step(step, description)
    print("quark " + " ".join(argv))
    code = quark(argv)
    if code != 0:
        print(f"❌ FAIL: exit code {code}")
        return False
    print("✅ PASS")
    return True


def main():
    """Run the complete E2E smoke test."""
    print("=" * 70)
    print("QUARK End-to-End Smoke Test")
    print("=" * 70)

    work = Path(tempfile.mkdtemp(prefix="quark-e2e-"))
    run = work / "train"
    steps = [
        ("Generate synthetic files", ["generate", *COMMON, "--out", str(work / "data")]),
        ("Train", ["train", *COMMON, "--epochs", "3", "--out", str(run)]),
        ("Evaluate with style report", ["eval", *COMMON, "--checkpoint", str(run / "checkpoint.qck"), "--style"]),
        ("Random-guess baseline", ["eval", *COMMON, "--baseline", "random", "--out", str(work / "random")]),
        ("Inspect one instance", ["inspect", *COMMON, "--checkpoint", str(run / "checkpoint.qck"), "--similarity"]),
        ("Sweep alpha", ["sweep", *COMMON, "--epochs", "1", "--key", "alpha", "--values", "0.0,0.5,1.0",
                         "--out", str(work / "sweep")]),
    ]

    results = []
    start_time = time.time()
    for number, (name, argv) in enumerate(steps, 1):
        try:
            result = run_quark(number, name, argv)
        except KeyboardInterrupt:
            print("\n\n⚠ Test interrupted by user")
            break
        except Exception as e:
            print(f"\n❌ Unexpected error in {name}: {e}")
            result = False
        results.append((name, result))
        if not result:
            print(f"\n⚠ Stopping early due to failure in: {name}")
            break

    elapsed = time.time() - start_time
    print("\n" + "=" * 70)
    print("E2E TEST SUMMARY")
    print("=" * 70)

    passed = sum(1 for _, result in results if result)
    for name, result in results:
        status = "✅ PASS" if result else "❌ FAIL"
        print(f"{status}: {name}")

    print(f"\nTotal: {passed}/{len(steps)} steps passed")
    print(f"Time elapsed: {elapsed:.1f} seconds")
    print(f"Artifacts: {work}")

    if passed == len(steps):
        print("\n🎉 All E2E steps passed! QUARK is working correctly.")
        return 0
    print("\n⚠ Some E2E steps failed. Please check the errors above.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
