#!/usr/bin/env python3
"""High-precision reference values for the Abel-function tests.

Evaluates the piecewise branch compositions with mpmath at 50 digits.  The
printed values are frozen into tests/abel_golden.hpp; rerun this script to
regenerate them.
"""
import mpmath as mp

mp.mp.dps = 50


def psi(x):
    x = mp.mpf(x)
    if x < 0:
        return mp.exp(x) - 1
    k = 0
    while x >= 1:
        x = mp.log(x)
        k += 1
    return x + k


def psi_inv(y):
    y = mp.mpf(y)
    if y <= -1:
        return mp.mpf('-inf')
    if y < 0:
        return mp.log(y + 1)
    k = int(mp.floor(y))
    v = y - k
    for _ in range(k):
        v = mp.exp(v)
    return v


def exp_n(n, x):
    return psi_inv(psi(x) + mp.mpf(n))


def addiplicate(x, y, n):
    return exp_n(n, exp_n(-mp.mpf(n), x) + exp_n(-mp.mpf(n), y))


def d_exp_n_dn(n, x, h=mp.mpf('1e-20')):
    return (exp_n(mp.mpf(n) + h, x) - exp_n(mp.mpf(n) - h, x)) / (2 * h)


def d_exp_n_dx(n, x, h=mp.mpf('1e-20')):
    return (exp_n(n, mp.mpf(x) + h) - exp_n(n, mp.mpf(x) - h)) / (2 * h)


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


if __name__ == "__main__":
    show("exp_neg_half(2)", exp_n(-0.5, 2))
    show("exp_neg_half(3)", exp_n(-0.5, 3))
    show("addiplicate(2,3,0.5)", addiplicate(2, 3, 0.5))
    show("addiplicate(2,3,0.25)", addiplicate(2, 3, 0.25))
    show("addiplicate(0.5,0.7,0.75)", addiplicate(0.5, 0.7, 0.75))
    show("exp_n(0.5,0.5)", exp_n(0.5, 0.5))
    show("exp_n(0.5,1.0)", exp_n(0.5, 1.0))
    show("exp_n(0.3,-0.7)", exp_n(0.3, -0.7))
    show("exp_n(-0.4,5)", exp_n(-0.4, 5))
    show("exp_n(1.7,0.2)", exp_n(1.7, 0.2))
    show("dn(0.5,0.5)", d_exp_n_dn(0.5, 0.5))
    show("dn(0.3,-0.7)", d_exp_n_dn(0.3, -0.7))
    show("dx(0.3,-0.7)", d_exp_n_dx(0.3, -0.7))
    show("dn(-0.4,5)", d_exp_n_dn(-0.4, 5))
    show("dx(-0.4,5)", d_exp_n_dx(-0.4, 5))
    show("psi(1e6)", psi(10**6))
    show("psi(-1)", psi(-1))
    show("psi_inv(3.5)", psi_inv(3.5))
