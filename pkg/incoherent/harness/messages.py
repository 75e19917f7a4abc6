import typing as t

from incoherent.exceptions import DuplicatedNameError
from incoherent.exceptions import InvalidNameError


class MessageMeta(type):
    """
    The Message metaclass.

    Message.NAME defaults to __module__.__name__
    Message.NAME type and collision check
    """

    _messages: dict[str, "MessageMeta"] = {}

    def __new__(cls, name, bases, dic, **kw):
        cls._set_default_name(name, dic)
        cls._check_name_type(name, dic)
        cls._check_unique_name(name, dic)

        message_cls = super().__new__(cls, name, bases, dic, **kw)
        cls._messages[message_cls.NAME] = message_cls
        return message_cls

    @classmethod
    def _set_default_name(cls, name, dic):
        if "NAME" not in dic:
            dic["NAME"] = f"{dic['__module__']}.{name}"

    @classmethod
    def _check_name_type(cls, name, dic):
        message_name = dic["NAME"]
        if not isinstance(message_name, str):
            raise InvalidNameError(
                f"'{name}.NAME' must be of 'str' type. Found: '{type(message_name)}'"
            )

    @classmethod
    def _check_unique_name(cls, name, dic):
        message_name = dic["NAME"]
        try:
            message_cls = cls._messages[message_name]
        except KeyError:
            return
        raise DuplicatedNameError(
            "These messages have the same NAME: "
            f"'{name}' and '{message_cls.__name__}'"
        )

    @classmethod
    def _clear(cls):
        """
        Resets internal state. For testing.
        """
        cls._messages = {}


class Message(metaclass=MessageMeta):
    NAME: t.ClassVar[str]


class ExperimentMeta(MessageMeta):
    """
    Registers experiments by NAME, which is also the CLI subcommand
    """

    _experiments: dict[str, "ExperimentMeta"] = {}

    def __new__(cls, name, bases, dic):
        experiment_cls = super().__new__(cls, name, bases, dic)
        if bases and bases != (Message,):
            cls._experiments[experiment_cls.NAME] = experiment_cls
        return experiment_cls

    @classmethod
    def registered(cls) -> dict[str, "ExperimentMeta"]:
        return dict(cls._experiments)

    @classmethod
    def _clear(cls):
        """
        Resets internal state. For testing.
        """
        cls._experiments = {}


class Experiment(Message, metaclass=ExperimentMeta):
    """
    A request to run one experiment. Exactly one runner handles it.
    """


class FindingMeta(MessageMeta):
    """
    The Finding metaclass
    """

    _findings: dict[str, "FindingMeta"] = {}

    def __new__(cls, name, bases, dic):
        finding_cls = super().__new__(cls, name, bases, dic)
        cls._findings[finding_cls.NAME] = finding_cls
        return finding_cls

    @classmethod
    def _clear(cls):
        """
        Resets internal state. For testing.
        """
        cls._findings = {}


class Finding(Message, metaclass=FindingMeta):
    """
    Something a runner computed or verified. Any number of listeners.
    """
