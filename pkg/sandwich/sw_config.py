#!/usr/bin/env python3
#
# This file is part of sandwich.
#
# sw_config.py : option defaults, configuration files and logging setup.
#
########################################################################
#  This program is free software; you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation; version 2 of the License.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with this program; if not, write to the Free Software
#  Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA 02111-1307  USA
#
#

"""
   configuration files are plain text, one option per line:

       # comment
       tolerance 1e-6
       declare env OUT=/tmp/runs
       logpath ${OUT}/sw.log
       include more.conf

   values are kept as given and converted when the option is read back
   through the typed accessors, so a bad value is reported with its option
   name at the point of use.
"""

import copy
import logging
import os
import sys

from logging import handlers

import appdirs

from sandwich.sw_linalg import ZeroThreshold
from sandwich.sw_util import ValidationError, isNone

APPNAME = 'sandwich'
APPAUTHOR = 'sandwich'

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(message)s'

LOGLEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL,
    'none': logging.CRITICAL + 10
}

DEFAULT_LOGPATH = 'default'

METHODS = ['mirror_descent', 'fixed_point', 'grid_oracle']


def user_config_dir():
    return appdirs.user_config_dir(APPNAME, APPAUTHOR)


def user_log_dir():
    return appdirs.user_log_dir(APPNAME, APPAUTHOR)


def default_logpath(command=None):
    name = "sw_%s.log" % command if command else "sw.log"
    return os.path.join(user_log_dir(), name)


class sw_config:

    def __init__(self, logger=None, config_dir=None):

        self.logger = logger if logger is not None else logging.getLogger(__name__)
        self.config_dir = config_dir if config_dir is not None else user_config_dir()
        self.env = copy.deepcopy(dict(os.environ))
        self.declared = {}

        self.zero_abs = 1e-12
        self.zero_rel = 1e-10
        self.log_base = '2'
        self.precision = 6
        self.tolerance = 1e-5
        self.max_iterations = 500
        self.method = 'mirror_descent'
        self.seed = 0
        self.trials = 0
        self.workers = 1
        self.loglevel = 'info'
        self.logpath = None
        self.lr_when = 'midnight'
        self.lr_interval = 1
        self.lr_backupCount = 5

    def options(self):
        return sorted(k for k in self.__dict__.keys() if k not in ('logger', 'config_dir', 'env', 'declared'))

    def _varsub(self, word):
        """ substitute ${NAME} from declared values, options, then the environment
        """
        if word is None or type(word) in [bool, int, float]:
            return word
        if '$' not in word:
            return word

        result = word
        names = []
        for part in word.split('}'):
            if '${' in part:
                names.append(part.split('${')[1])
        for E in names:
            if E in self.declared:
                value = self.declared[E]
            elif hasattr(self, E.lower()) and E.lower() in self.options():
                value = getattr(self, E.lower())
            elif E in self.env:
                value = self.env[E]
            else:
                self.logger.warning("undefined variable %s in %s" % (E, word))
                continue
            result = result.replace('${' + E + '}', str(value))
            if sys.platform == 'win32':
                result = result.replace('\\', '/')
        return result

    def _parse_declare(self, words):
        if len(words) < 2 or words[0] not in ['env', 'envvar', 'var', 'value'] or '=' not in words[1]:
            raise ValidationError("invalid declare: {}".format(' '.join(words)))
        name, value = words[1].split('=', 1)
        self.declared[name] = value

    def parse_file(self, cfg):
        """ add settings in file to self
        """
        if not os.path.isabs(cfg) and not os.path.exists(cfg):
            cfg = os.path.join(self.config_dir, cfg)
        self.logger.debug("sw_config parse_file %s" % cfg)
        with open(cfg, "r") as fp:
            lines = fp.readlines()
        for l in lines:
            line = l.split()
            if (len(line) < 1) or (line[0].startswith('#')):
                continue

            line = list(map(lambda x: self._varsub(x), line))

            if line[0] in ['declare']:
                self._parse_declare(line[1:])
            elif line[0] in ['include']:
                self.parse_file(line[1])
            elif line[0] in self.options():
                setattr(self, line[0], ' '.join(line[1:]))
            else:
                raise ValidationError("unknown option in {}: {}".format(cfg, line[0]))

    def read_default(self):
        """ default.conf in the user configuration directory, when there is one """
        path = os.path.join(self.config_dir, 'default.conf')
        if os.path.exists(path):
            self.parse_file(path)

    def _override_field(self, key, value):
        if key in self.options():
            setattr(self, key, self._varsub(value))

    def override(self, oth):
        """ set every option present in oth, a dict or an argparse namespace, that is not None """
        items = oth.items() if type(oth) == dict else vars(oth).items()
        for k, v in items:
            if v is not None:
                self._override_field(k, v)

    def dump(self):
        for k in self.options():
            print("%s=%s" % (k, getattr(self, k)))

    #============================================================
    # typed accessors

    def get_float(self, option):
        try:
            return float(getattr(self, option))
        except (TypeError, ValueError):
            raise ValidationError("option {} is not a number: {}".format(option, getattr(self, option)))

    def get_int(self, option):
        try:
            return int(getattr(self, option))
        except (TypeError, ValueError):
            raise ValidationError("option {} is not an integer: {}".format(option, getattr(self, option)))

    @property
    def zero(self):
        return ZeroThreshold(self.get_float('zero_abs'), self.get_float('zero_rel'))

    @property
    def base(self):
        b = str(self.log_base)
        if b not in ('2', 'e'):
            raise ValidationError("option log_base must be 2 or e: {}".format(self.log_base))
        return 2 if b == '2' else 'e'

    @property
    def level(self):
        lvl = str(self.loglevel).lower()
        if lvl not in LOGLEVELS:
            raise ValidationError("option loglevel must be one of {}: {}".format(', '.join(LOGLEVELS), lvl))
        return LOGLEVELS[lvl]

    def check_method(self):
        if self.method not in METHODS:
            raise ValidationError("option method must be one of {}: {}".format(', '.join(METHODS), self.method))
        return self.method

    #============================================================
    # logging

    def setlog(self, command=None):
        """ logpath "default" means one file per command in the user log directory """
        root = logging.getLogger()
        if root.hasHandlers():
            for h in list(root.handlers):
                h.close()
                root.removeHandler(h)
        root.setLevel(self.level)

        if self.logpath == DEFAULT_LOGPATH:
            self.logpath = default_logpath(command)

        if isNone(self.logpath):
            logging.basicConfig(format=LOG_FORMAT, level=self.level)
            root.debug("logging to the console with {}".format(root))
        else:
            root.addHandler(self.create_handler(LOG_FORMAT, self.level))
            root.debug("logging to file ({}) with {}".format(self.logpath, root))

    def create_handler(self, log_format, level):
        if os.path.dirname(self.logpath):
            os.makedirs(os.path.dirname(self.logpath), exist_ok=True)
        if self.get_int('lr_interval') > 0 and self.get_int('lr_backupCount') > 0:
            handler = handlers.TimedRotatingFileHandler(self.logpath, when=self.lr_when,
                                                        interval=self.get_int('lr_interval'),
                                                        backupCount=self.get_int('lr_backupCount'))
        else:
            handler = logging.FileHandler(self.logpath)
        handler.setFormatter(logging.Formatter(log_format))
        handler.setLevel(level)
        return handler
