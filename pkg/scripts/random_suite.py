#!/usr/bin/env python3
"""
Run the random-instance property suites

Usage:
    python scripts/random_suite.py
    python scripts/random_suite.py --seed 7 --count 50
    python scripts/random_suite.py --suite solver
"""

import sys
import random
import argparse
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv
load_dotenv()

from ratimpl import init_toolkit
from ratimpl.data.random_instances import random_environment, random_game
from ratimpl.services.axioms import AxiomChecker
from ratimpl.services.characterization import characterize
from ratimpl.services.rationalizability import (
    best_reply_witness, find_dominance_certificate, solve_rationalizable
)
from ratimpl.services.settings import get_settings


def implication_suite(rng, count):
    """smm* implies smm**, strict Maskin implies Maskin"""
    violations = 0
    for _ in range(count):
        checker = AxiomChecker(random_environment(rng))
        if checker.check_strict_maskin_star().holds and not checker.check_strict_maskin_star_star().holds:
            violations += 1
        if checker.check_strict_maskin().holds and not checker.check_maskin_monotonicity().holds:
            violations += 1
    return violations


def responsive_suite(rng, count):
    """Strict event monotonicity vs iterated elimination on responsive instances"""
    violations = 0
    for _ in range(count):
        checker = AxiomChecker(random_environment(rng, responsive=True))
        if checker.check_strict_event_monotonicity().holds != checker.check_iterated_elimination_all().holds:
            violations += 1
    return violations


def nwa_suite(rng, count):
    """Strict event monotonicity vs strict Maskin when no agent ever gets a worst outcome"""
    violations = 0
    for _ in range(count):
        checker = AxiomChecker(random_environment(rng, responsive=True, nwa=True))
        if not checker.check_nwa().holds:
            violations += 1
        elif checker.check_strict_event_monotonicity().holds != checker.check_strict_maskin().holds:
            violations += 1
    return violations


def characterization_suite(rng, count):
    """Every applicable criterion agrees with the full characterization"""
    violations = 0
    for k in range(count):
        env = random_environment(rng, responsive=k % 2 == 0, nwa=k % 3 == 0)
        if not characterize(env).agree:
            violations += 1
    return violations


def solver_suite(rng, count):
    """Fixed point and belief / dominance duality"""
    violations = 0
    for _ in range(count):
        game = random_game(rng)
        survivors = solve_rationalizable(game)
        if not survivors.verify(game):
            violations += 1
        full = game.strategies
        for player in game.players:
            for s in full[player]:
                witness = best_reply_witness(game, player, s, full)
                certificate = find_dominance_certificate(game, player, s, full)
                if (witness is None) == (certificate is None):
                    violations += 1
    return violations


SUITES = {
    'implication': implication_suite,
    'responsive': responsive_suite,
    'nwa': nwa_suite,
    'characterization': characterization_suite,
    'solver': solver_suite,
}


def main():
    init_toolkit()
    settings = get_settings()

    parser = argparse.ArgumentParser(description='Run the random-instance property suites')
    parser.add_argument('--seed', type=int, default=settings.random_seed, help='Random seed')
    parser.add_argument('--count', type=int, default=settings.random_instances, help='Instances per suite')
    parser.add_argument('--suite', type=str, choices=list(SUITES), help='Run a single suite')

    args = parser.parse_args()
    names = [args.suite] if args.suite else list(SUITES)

    print("=" * 50)
    print(f"🎲 Seed {args.seed}, {args.count} instances per suite")
    print("=" * 50)

    failed = 0
    for name in names:
        violations = SUITES[name](random.Random(args.seed), args.count)
        if violations:
            failed += 1
            print(f"❌ {name}: {violations} violations")
        else:
            print(f"✅ {name}: {args.count}/{args.count}")

    print("=" * 50)
    return 1 if failed else 0


if __name__ == '__main__':
    sys.exit(main())
