# event.py
#
# Descriptor-based callback events, after pyevent
# (http://www.emptypage.jp/notes/pyevent.en.html).
#
# License: https://creativecommons.org/licenses/by/2.1/jp/deed.en
#
# Changes for qhgeo:
#   * Handler lists are guarded by a per-owner lock so estimators can fire
#     from worker threads.
#   * fire() iterates over a snapshot, so handlers may unsubscribe themselves.
#   * Added len() and membership tests.

import threading


class Event(object):
    """
    Class-level event declaration.  Accessing it through an instance yields an
    :py:class:`EventHandler` bound to that instance.
    """

    def __init__(self, doc=None):
        self.__doc__ = doc

    def __get__(self, obj, objtype=None):
        if obj is None:
            return self
        return EventHandler(self, obj)

    def __set__(self, obj, value):
        pass


class EventHandler(object):
    """
    Handler list of one event on one owner object.
    """

    _registry_lock = threading.Lock()

    def __init__(self, event, obj):
        self.event = event
        self.obj = obj

    def __iter__(self):
        return iter(self._snapshot())

    def __len__(self):
        return len(self._snapshot())

    def __contains__(self, func):
        return func in self._snapshot()

    def _state(self):
        """(internal use) Returns the owner's (lock, handler dict)."""
        with EventHandler._registry_lock:
            try:
                state = self.obj.__eventhandler__
            except AttributeError:
                state = self.obj.__eventhandler__ = (threading.RLock(), {})
        return state

    def _snapshot(self):
        lock, handlers = self._state()
        with lock:
            return list(handlers.get(self.event, []))

    def add(self, func):
        """
        Adds a handler.  Handlers are called as ``func(sender, *args, **kwargs)``.
        You can also use the ``+=`` operator.
        """
        lock, handlers = self._state()
        with lock:
            handlers.setdefault(self.event, []).append(func)
        return self

    def remove(self, func):
        """
        Removes a handler.  You can also use the ``-=`` operator.
        """
        lock, handlers = self._state()
        with lock:
            handlers.setdefault(self.event, []).remove(func)
        return self

    def clear(self):
        lock, handlers = self._state()
        with lock:
            handlers[self.event] = []
        return self

    def fire(self, *args, **kwargs):
        """
        Fires the event, calling every handler.  Calling the handler object
        itself is equivalent.
        """
        for func in self._snapshot():
            if isinstance(func, EventHandler):
                func.fire(*args, **kwargs)
            else:
                func(self.obj, *args, **kwargs)

    __iadd__ = add
    __isub__ = remove
    __call__ = fire
