from .event import Event, EventHandler

__all__ = ['Event', 'EventHandler']
