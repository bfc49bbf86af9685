import os
import re

import pyparsing as pp

from synthlab.errors import ConfigError


class ArgumentFormatParser:
    """
    A command line override may have the following format*:

        ARGUMENT = <SECTION>.<KEY>=<VALUE> | <SECTION>.<KEY>:<FILE>

        SECTION = The name of a configuration section (e.g. experiment).
        KEY     = The name of a key inside the section (e.g. trials).
        VALUE   = A value in configuration file notation (e.g. 25, 1:64:2, 0, 0.05, 0.1).
        FILE    = A relative or absolute filename which needs to exist. Every line holds one list item.

    *) optional parts are denoted with square brackets.
    """

    def parse(self, argument: str) -> dict:
        """
        Parses the argument into a dict mapping the qualified key to its textual value.

        :param argument: the override (e.g. "experiment.trials=5", "experiment.eta_values:etas.txt")
        :return: a dict with a single entry (e.g. {'experiment.trials': '5'}, {'experiment.eta_values': '0, 0.1'}).
        """
        match = re.fullmatch(r"(\w+\.\w+)([=:])(.*)", argument.strip())
        if not match:
            raise ConfigError("Parsing argument '{}' failed! Expected SECTION.KEY=VALUE or SECTION.KEY:FILE!".format(
                argument))
        name, separator, value = match.groups()
        return {
            "=": self._parse_value,
            ":": self._parse_file,
        }.get(separator)(name, value)

    def _parse_value(self, name: str, value: str) -> dict:
        return {name: value.strip()}

    def _parse_file(self, name: str, value: str) -> dict:
        file = os.path.expanduser(value)
        if not os.path.isfile(file):
            raise ConfigError("Parsing argument '{}' failed! The file '{}' was not found!".format(name, file))
        try:
            with open(file) as f:
                items = [line.strip() for line in f.read().splitlines() if line.strip()]
        except (OSError, UnicodeDecodeError):
            raise ConfigError("Parsing argument '{}' failed! The file '{}' has an invalid format!".format(name, file))
        return {name: ", ".join(items)}


class ConfigFormatParser:
    """
    Parses a configuration file into a list of (section, key, value) triples.

        [section]
        # comment
        key = value

    Keys of the [desk] section are qualified (section.key). Values are returned as stripped text.
    """

    LBRACK, RBRACK, EQ = map(pp.Suppress, "[]=")

    # Section and key names
    name = pp.Word(pp.alphas, pp.alphanums + "_-.")

    # Everything up to the end of the line or a comment
    value = pp.Regex(r"[^#\n]*").leaveWhitespace().setParseAction(lambda tokens: tokens[0].strip())

    section = pp.Group(LBRACK + name.setResultsName("section") + RBRACK)

    assignment = pp.Group(name.setResultsName("key") + EQ + value.setResultsName("value"))

    document = pp.ZeroOrMore(section | assignment)
    document.ignore(pp.pythonStyleComment)

    def parse(self, text: str) -> list:
        try:
            tokens = self.document.parseString(text, parseAll=True)
        except pp.ParseException as err:
            raise ConfigError("Parsing configuration failed! Line {}: '{}'!".format(err.lineno, err.line.strip()))

        result = []
        current = None
        for token in tokens:
            if "section" in token:
                current = token["section"]
            elif current is None:
                raise ConfigError("Parsing configuration failed! Key '{}' appears before any section!".format(
                    token["key"]))
            else:
                result.append((current, token["key"], token["value"]))
        return result


class ValueFormatParser:
    """
    Parses the textual value of a configuration key.

        LIST  = ITEM [, ITEM ...]
        ITEM  = RANGE | NUMBER | WORD
        RANGE = START:STOP[:STEP]   (inclusive; STEP defaults to 1)

    Examples:

        "1:9:4"          => [1, 5, 9]
        "0:0.1:0.05"     => [0.0, 0.05, 0.1]
        "2, 4, 8"        => [2, 4, 8]
    """

    COLON = pp.Suppress(":")

    number = pp.Regex(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")

    range_item = pp.Group(number + COLON + number + pp.Optional(COLON + number))

    item = range_item | number

    items = pp.Optional(pp.delimitedList(item))

    def parse_list(self, text: str, kind):
        """ Parses a comma separated list of numbers and ranges into a list of kind (int or float). """
        try:
            tokens = self.items.parseString(text, parseAll=True)
        except pp.ParseException:
            raise ConfigError("Parsing value '{}' failed! Expected a list of numbers or ranges!".format(text))
        values = []
        for token in tokens:
            if isinstance(token, str):
                values.append(self._number(token, kind))
            else:
                values.extend(self._expand(token, kind))
        return values

    def _number(self, text, kind):
        try:
            return kind(text)
        except ValueError:
            raise ConfigError("Parsing value '{}' failed! Expected {}!".format(
                text, "an integer" if kind is int else "a number"))

    def _expand(self, token, kind):
        start, stop = self._number(token[0], kind), self._number(token[1], kind)
        step = self._number(token[2], kind) if len(token) > 2 else 1
        if not step > 0:
            raise ConfigError("Parsing range failed! Expected a positive step, got {}!".format(step))
        if kind is int:
            return list(range(start, stop + 1, step))
        count = int(round((stop - start) / step + 1e-9)) + 1
        # Rounding keeps grids such as 0:1:0.05 free of accumulated floating point noise.
        return [round(start + index * step, 12) for index in range(max(0, count))]
