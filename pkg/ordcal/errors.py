"""Exceptions raised by the ordcal library.

User errors subclass ``ValueError``. Numerical failures subclass
``NumericalError`` so the commands can map them to exit code 2.
"""


class SpecificationError(ValueError):
    def __init__(self, value):
        self.value = value

    def __str__(self):
        return 'Invalid model specification: {}'.format(self.value)


class DatasetError(ValueError):
    def __init__(self, message, row=None, column=None):
        self.message = message
        self.row = row
        self.column = column

    def __str__(self):
        where = []
        if self.row is not None:
            where.append('row {}'.format(self.row))
        if self.column is not None:
            where.append('column "{}"'.format(self.column))
        if where:
            return '{} ({})'.format(self.message, ', '.join(where))
        return self.message


class EmptyCategoryError(ValueError):
    def __init__(self, categories):
        self.categories = list(categories)

    def __str__(self):
        msg = 'Every outcome category must be observed to fit. Missing: {}'
        return msg.format(', '.join(str(c) for c in self.categories))


class DegenerateTargetError(ValueError):
    def __init__(self, target):
        self.target = target

    def __str__(self):
        msg = 'Calibration target {} has only events or only non-events'
        return msg.format(self.target)


class DegenerateBasisError(ValueError):
    def __init__(self, predictor):
        self.predictor = predictor

    def __str__(self):
        msg = 'Cannot build a spline basis for {}: the values do not vary'
        return msg.format(self.predictor)


class ModelFormatError(ValueError):
    def __init__(self, value):
        self.value = value

    def __str__(self):
        return 'Not a usable model document: {}'.format(self.value)


class StudyFormatError(ModelFormatError):
    def __str__(self):
        return 'Not a usable study document: {}'.format(self.value)


class NumericalError(ArithmeticError):
    """Base class for failures of the numerical machinery."""


class NonFiniteError(NumericalError):
    def __init__(self, quantity, index):
        self.quantity = quantity
        self.index = index

    def __str__(self):
        msg = 'Non-finite {} at index {}'
        return msg.format(self.quantity, self.index)


class ConvergenceError(NumericalError):
    def __init__(self, what, detail=''):
        self.what = what
        self.detail = detail

    def __str__(self):
        msg = '{} did not converge'.format(self.what)
        if self.detail:
            msg = '{}: {}'.format(msg, self.detail)
        return msg


class NoPredictiveVariationError(NumericalError):
    def __str__(self):
        return ('no predictive variation: the predictions equal the event '
                'rates everywhere')


class LRTestError(NumericalError):
    def __init__(self, predictor, detail):
        self.predictor = predictor
        self.detail = detail

    def __str__(self):
        msg = 'Likelihood ratio test failed for predictor "{}": {}'
        return msg.format(self.predictor, self.detail)
