from unittest import TestCase
from mock import Mock

from qhgeo.event import Event, EventHandler


class Source(object):
    on_ping = Event("Test event.\n\n**Callback definition:** *def callback(source, value)*")

    def ping(self, value):
        self.on_ping(value=value)


class TestEvent(TestCase):
    def setUp(self):
        self._source = Source()

    def tearDown(self):
        pass

    ### Tests
    def test_class_access(self):
        self.assertIsInstance(Source.on_ping, Event)
        self.assertIsInstance(self._source.on_ping, EventHandler)
        self.assertIn('Callback definition', Source.on_ping.__doc__)

    def test_fire(self):
        handler = Mock()
        self._source.on_ping += handler

        self._source.ping(3)

        handler.assert_called_once_with(self._source, value=3)
        self.assertEqual(len(self._source.on_ping), 1)
        self.assertIn(handler, self._source.on_ping)

    def test_remove(self):
        handler = Mock()
        self._source.on_ping += handler
        self._source.on_ping -= handler

        self._source.ping(3)

        self.assertFalse(handler.called)

    def test_per_instance(self):
        handler = Mock()
        other = Source()
        self._source.on_ping += handler

        other.ping(1)

        self.assertFalse(handler.called)

    def test_unsubscribe_while_firing(self):
        calls = []

        def once(sender, value):
            calls.append(value)
            sender.on_ping -= once

        self._source.on_ping += once
        self._source.ping(1)
        self._source.ping(2)

        self.assertEqual(calls, [1])

    def test_clear(self):
        self._source.on_ping += Mock()
        self._source.on_ping.clear()

        self.assertEqual(len(self._source.on_ping), 0)
