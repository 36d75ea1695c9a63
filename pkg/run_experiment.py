"""
Run a phase-space experiment from the repository root.

    python run_experiment.py run --config gabor16 --out artifacts/gabor16
    python run_experiment.py verify --config gabor16 --baseline artifacts/gabor16
"""

from phasecover.cli import main

if __name__ == "__main__":
    main()
