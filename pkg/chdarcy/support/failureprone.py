"""
This module is all about easing over the process to display where things go wrong
in a hand-written text, which in this package means a configuration file.

If you can localize where an error came from, you'd generally like to include some
context in the report: show the offending line, with the offending part underlined.
The `illustration` function makes that picture from a single line of text. The
SourceText keeps track of where the lines are, so a reader that works line by line
can turn (row, column, width) into a decent-looking complaint, prefixed with the
file name when there is one.

Line breaks follow the Unix, Apple and DOS conventions; nothing fancier is needed
for configuration files.
"""
import re

LINE_BREAK = re.compile(r'\r\n?|\n')

def illustration(single_line:str, start:int, width:int=0, *, prefix='', caption="near here") -> str:
	""" Builds up a picture of where something appears in a line of text. Useful for polite error messages. """
	blanks = ''.join(c if c == '\t' else ' ' for c in prefix + single_line[:start])
	underline = '^' * max(1, min(width, len(single_line) - start))
	return prefix + single_line.rstrip() + '\n' + blanks + underline + " " + caption

class SourceText:
	""" Wrapper for a text that participates in half-respectable error display with context. """
	def __init__(self, content:str, filename:str=None, first_line:int=1):
		self.content = content
		self.filename = filename
		self.first_line = first_line
		self.__lines = LINE_BREAK.split(content)
		if self.__lines and self.__lines[-1] == '': self.__lines.pop()

	def numbered_lines(self):
		""" Yield (row, text) pairs, rows respecting self.first_line. """
		for offset, text in enumerate(self.__lines): yield offset + self.first_line, text

	def line_of_text(self, row:int) -> str:
		return self.__lines[row - self.first_line]

	def _format_message(self, row, col, message):
		prefix = "At" if self.filename is None else str(self.filename) + ":"
		return "%s line %d, column %d: %s" % (prefix, row, col + 1, message)

	def complaint(self, row:int, col:int, width:int, message:str) -> str:
		line = self.line_of_text(row)
		return "%s\n%s" % (self._format_message(row, col, message), illustration(line, col, width, prefix=' >>> '))
