"""Exact expected training-episode reward of a softmax policy on the converged Taxi Q-table.

Solves Q* by value iteration, then evaluates the softmax(rho * Q*) policy by
finite-horizon dynamic programming over the 200-step episode cap, averaged over
the uniform start distribution. No sampling involved.

    python scripts/softmax_ceiling.py --gamma 0.9 --rho 0.5 0.9 2 5 100
"""

import argparse

import numpy as np

from voi_arbiter.environment import TaxiEnv


def tables(env):
    nxt = np.array([[env.step(s, a).next_state for a in range(6)] for s in range(500)])
    rew = np.array([[env.step(s, a).reward for a in range(6)] for s in range(500)])
    term = np.array([[env.step(s, a).terminal for a in range(6)] for s in range(500)])
    return nxt, rew, term


def optimal_q(nxt, rew, term, gamma, tol=1e-12):
    q = np.zeros((500, 6))
    while True:
        new = rew + np.where(term, 0.0, gamma * q.max(axis=1)[nxt])
        if np.abs(new - q).max() < tol:
            return new
        q = new


def softmax_policy(q, rho):
    z = rho * (q - q.max(axis=1, keepdims=True))
    p = np.exp(z)
    return p / p.sum(axis=1, keepdims=True)


def expected_return(policy, nxt, rew, term, horizon):
    """Undiscounted expected reward within ``horizon`` steps, for every start state."""
    v = np.zeros(500)
    for _ in range(horizon):
        v = (policy * (rew + np.where(term, 0.0, v[nxt]))).sum(axis=1)
    return v


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gamma", type=float, default=0.9)
    parser.add_argument("--rho", type=float, nargs="+", default=[0.5, 0.9, 1.5, 2.0, 3.0, 5.0, 10.0, 1000.0])
    parser.add_argument("--horizon", type=int, default=200)
    args = parser.parse_args()

    env = TaxiEnv()
    nxt, rew, term = tables(env)
    q = optimal_q(nxt, rew, term, args.gamma)
    starts = env.start_states
    greedy = np.eye(6)[q.argmax(axis=1)]
    print(f"gamma={args.gamma}  greedy optimum: {expected_return(greedy, nxt, rew, term, args.horizon)[starts].mean():.3f}")
    for rho in args.rho:
        v = expected_return(softmax_policy(q, rho), nxt, rew, term, args.horizon)
        print(f"rho={rho:<8g} expected episode reward {v[starts].mean():8.3f}")


if __name__ == "__main__":
    main()
