class BaseError(KeyError):
    def __init__(self, *args):
        """
        Initializes the object with an optional message.

        Args:
            *args: An optional message to be stored in the object. If provided, it should be a single argument.

        Returns:
            None
        """
        if args:
            self.message = args[0]
        else:
            self.message = None


class PauliAlgebraError(BaseError):
    def __str__(self):
        """
        Returns a string representation of the PauliAlgebraError object.
        """
        if self.message:
            return f"Invalid Pauli algebra operation: {self.message}"
        else:
            return "Invalid Pauli algebra operation"


class StateVectorError(BaseError):
    def __str__(self):
        if self.message:
            return f"Statevector error: {self.message}"
        else:
            return "Statevector error"


class LatticeError(BaseError):
    def __str__(self):
        """
        Returns a string representation of the LatticeError object. If the object has a message attribute,
        it returns a formatted string with the message. Otherwise, it returns a generic geometry complaint.

        Returns:
            str: The string representation of the LatticeError object.
        """
        if self.message:
            return f"Invalid lattice geometry: {self.message}"
        else:
            return "Invalid lattice geometry"


class ScheduleError(BaseError):
    def __str__(self):
        if self.message:
            return f"Invalid extraction schedule: {self.message}"
        else:
            return "Invalid extraction schedule"


class MatchingError(BaseError):
    def __str__(self):
        if self.message:
            return f"Matching failed: {self.message}"
        else:
            return "Matching failed"


class NoCrossingError(BaseError):
    def __str__(self):
        """
        Returns a string representation of the NoCrossingError object.
        """
        if self.message:
            return f"Lifetime curves do not cross in the sampled range: {self.message}"
        else:
            return "Lifetime curves do not cross in the sampled range"


class ConfigError(BaseError):
    def __str__(self):
        if self.message:
            return f"Invalid configuration: {self.message}"
        else:
            return "Invalid configuration"


class FixtureError(BaseError):
    def __str__(self):
        if self.message:
            return f"Corrupted circuit fixture: {self.message}"
        else:
            return "Corrupted circuit fixture"
