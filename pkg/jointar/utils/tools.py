import os
import time
from functools import wraps


dict_time = dict()


def timethis(func):
    '''
    Decorator that accumulates call counts and execution time
    in `dict_time`, keyed by function name.
    '''
    dict_time[func.__name__] = (0, 0)

    @wraps(func)
    def wrapper(*args, **kwargs):
        start = time.time()
        result = func(*args, **kwargs)
        end = time.time()

        k, t = dict_time[func.__name__]
        dict_time[func.__name__] = k+1, t + end-start

        return result
    return wrapper


def timing_summary():
    '''
    Lines of the form "name: calls=k total=t s" for every
    function that has been called at least once.
    '''
    lines = []
    for name, (k, t) in sorted(dict_time.items()):
        if k:
            lines.append('%s: calls=%d total=%.3fs' % (name, k, t))
    return lines


THREADS_ENV = 'UNIFLUID_THREADS'

def max_workers(default=None):
    '''
    Number of threads the data pipeline may use, capped
    by the UNIFLUID_THREADS environment variable.
    '''
    if default is None:
        default = os.cpu_count() or 1
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return max(1, default)
    try:
        cap = int(value)
    except ValueError:
        raise ValueError('%s must be an integer, got %r' % (THREADS_ENV, value))
    return max(1, min(default, cap))
