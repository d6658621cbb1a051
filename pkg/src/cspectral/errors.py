"""Exception hierarchy.

Every error carries the process exit code the command-line front end maps it
to: 2 for bad input or an inadmissible configuration, 3 when the solver ran
but produced no feasible cut.
"""


class CSPError(Exception):
    exit_code = 2


class InvalidMatrix(CSPError):
    pass


class SingularPencil(CSPError):
    pass


class InvalidK(CSPError):
    pass


class InvalidInput(CSPError):
    pass


class DegenerateData(CSPError):
    pass


class DisconnectedGraph(CSPError):
    pass


class IsolatedNode(DisconnectedGraph):
    """A node with zero degree; the most local form of disconnection."""


class FormatError(CSPError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class InvalidConstraint(CSPError):
    pass


class InsufficientLabels(CSPError):
    pass


class InsufficientPairs(CSPError):
    pass


class BetaOutOfRange(CSPError):
    def __init__(self, beta, bound, bound_eig, vol):
        super().__init__(
            f"beta={beta:.6g} must be smaller than {bound_eig:.4f}*vol = {bound:.6g} (vol={vol:.6g})"
        )
        self.beta = beta
        self.bound = bound
        self.bound_eig = bound_eig
        self.vol = vol


class SingularWeighting(CSPError):
    pass


class NoFeasibleCut(CSPError):
    exit_code = 3

    def __init__(self, message="no feasible cut", n_complex=0, n_nonpositive=0, n_trivial=0):
        super().__init__(
            f"{message} (filtered: {n_complex} complex, {n_nonpositive} non-positive, {n_trivial} trivial)"
        )
        self.n_complex = n_complex
        self.n_nonpositive = n_nonpositive
        self.n_trivial = n_trivial
