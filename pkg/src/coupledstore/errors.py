"""Exception types raised by the synthesis and simulation pipeline."""


class StorageError(Exception):
    """Base class for physics-level failures (as opposed to bad arguments)."""

    kind = "StorageError"
    _fields = ()  # constructor arguments, in order, for pickling

    def __reduce__(self):
        # rebuild from constructor arguments so errors survive process pools;
        # extra attributes such as axis_value ride along in __dict__
        if not self._fields:
            return type(self), self.args, self.__dict__
        return type(self), tuple(getattr(self, f) for f in self._fields), self.__dict__

    def record(self):
        """Machine-readable description of the failure."""
        return {"error": self.kind, "message": str(self)}


class NegativeRadicand(StorageError):
    """The stored-amplitude radicand went negative: the pulse rises faster
    than the cavity linewidth can follow."""

    kind = "NegativeRadicand"
    _fields = ("t", "value", "t_range")

    def __init__(self, t, value, t_range=None):
        self.t = float(t)
        self.value = float(value)
        self.t_range = None if t_range is None else (float(t_range[0]), float(t_range[1]))
        msg = f"radicand {self.value:.6e} < 0 at t={self.t:.6g}"
        if self.t_range is not None:
            msg += f" (negative over [{self.t_range[0]:.6g}, {self.t_range[1]:.6g}])"
        super().__init__(msg)

    def record(self):
        rec = super().record()
        rec.update(t=self.t, value=self.value)
        if self.t_range is not None:
            rec["t_range"] = list(self.t_range)
        return rec


class DegenerateDenominator(StorageError):
    """c_b is below its floor while the coupling numerator is not negligible."""

    kind = "DegenerateDenominator"
    _fields = ("t", "numerator", "c_b")

    def __init__(self, t, numerator, c_b):
        self.t = float(t)
        self.numerator = float(numerator)
        self.c_b = float(c_b)
        super().__init__(
            f"c_b={self.c_b:.3e} below floor with numerator {self.numerator:.3e} at t={self.t:.6g}"
        )

    def record(self):
        rec = super().record()
        rec.update(t=self.t, numerator=self.numerator, c_b=self.c_b)
        return rec


class Unconverged(StorageError):
    """Mode-B population still drifts at the end of the record."""

    kind = "Unconverged"
    _fields = ("drift",)

    def __init__(self, drift):
        self.drift = float(drift)
        super().__init__(f"population drifts by {self.drift:.3e} over the final 5% of the grid")

    def record(self):
        rec = super().record()
        rec["drift"] = self.drift
        return rec


class GridMismatch(StorageError):
    kind = "GridMismatch"


class IntegrationError(StorageError):
    """Non-finite state encountered while stepping."""

    kind = "IntegrationError"
    _fields = ("t",)

    def __init__(self, t):
        self.t = float(t)
        super().__init__(f"non-finite state at t={self.t:.6g}")

    def record(self):
        rec = super().record()
        rec["t"] = self.t
        return rec
