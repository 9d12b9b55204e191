"""Schedule quantities and bound values at 50 significant digits.

Independent of the Rust implementation; the printed values are frozen into
the test suites.
"""
from mpmath import mp, mpf, e, exp, log, floor, ceil

mp.dps = 50


def iterations(n, alpha, theta):
    return int(floor((n / e + 1 + alpha) / (alpha * theta)))


def schedule(n, eps):
    n, eps = mpf(n), mpf(eps)
    k_hat = iterations(n, log(1 + eps / (3 * n)), eps / 3)
    r_hat = mpf(k_hat + 2) / (k_hat + 1)
    eps_p = 3 * eps / (2 * r_hat + 1)
    alpha = log(1 + eps_p / (3 * n))
    theta = eps_p / 3
    k = iterations(n, alpha, theta)
    k_prime = int(ceil(log(eps_p / (3 * n)) / log(mpf("0.5"))))
    r = mpf(k + 2) / (k + 1)
    predicted = r * eps_p / 3 + eps_p / 3 + r * eps_p / 3
    return dict(k_hat=k_hat, eps_prime=eps_p, alpha=alpha, theta=theta, K=k,
                k_prime=k_prime, predicted_error=predicted)


def four_term(n, alpha, k):
    n, alpha = mpf(n), mpf(alpha)
    r = mpf(k + 2) / (k + 1)
    return n / e / (alpha * (k + 1)) + mpf(1) / (k + 1) + r * n * (exp(alpha) - 1) + r * n * mpf("0.5") ** k


if __name__ == "__main__":
    for n, eps in [(3, "0.2"), (1, "1")]:
        print(f"schedule({n}, {eps}):")
        for key, v in schedule(n, eps).items():
            print(f"  {key} = {mp.nstr(v, 20) if not isinstance(v, int) else v}")
    print("four_term(1, 1, 0) =", mp.nstr(four_term(1, 1, 0), 20))
    gap = four_term(3, "0.01", 10**6) - 3 * (exp(mpf("0.01")) - 1)
    print("four_term(3, 0.01, 1e6) - 3(e^0.01 - 1) =", mp.nstr(gap, 20))
    print("RE((1/2,1/2) || (1/4,3/4)) =", mp.nstr(mpf("0.5") * log(2) + mpf("0.5") * log(mpf(2) / 3), 20))
    worst = max(
        (schedule(n, eps)["predicted_error"] / mpf(eps), n, eps)
        for n in range(2, 11) for eps in ["0.05", "0.1", "0.2", "0.5"]
    )
    print("max predicted/eps over sweep =", mp.nstr(worst[0], 20), "at", worst[1:])
