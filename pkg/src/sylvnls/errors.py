"""Exception types raised by the solver."""


class SingularOperator(ArithmeticError):
    """The Lyapunov operator X -> A X + X A is (numerically) not invertible."""

    def __init__(self, min_pair_sum, threshold):
        self.min_pair_sum = float(min_pair_sum)
        self.threshold = float(threshold)
        super().__init__(
            f"Lyapunov operator singular: min |l_i + l_j| = {self.min_pair_sum:.3e}"
            f" <= {self.threshold:.3e}"
        )


class FixedPointDivergence(RuntimeError):
    """The implicit nonlinear iteration did not converge within its budget."""

    def __init__(self, iterations, last_increment):
        self.iterations = iterations
        self.last_increment = last_increment
        super().__init__(
            f"fixed point not converged after {iterations} iterations "
            f"(relative increment {last_increment:.3e})"
        )


class DivergenceError(RuntimeError):
    """A run blew up; raised by studies that cannot continue past it."""

    def __init__(self, message, step=None):
        self.step = step
        super().__init__(message)


class ConfigError(ValueError):
    """Invalid experiment configuration."""
