import os

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "ldit", "data")


def data(name):
    return os.path.join(DATA, name)
