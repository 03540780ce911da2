#!/usr/bin/python3
# -*- mode: python; coding: utf-8 -*-

import hindcast.cmd.root

import hindcast.cmd.fit
import hindcast.cmd.risk
import hindcast.cmd.synth


(
    hindcast.cmd.root

    and hindcast.cmd.fit
    and hindcast.cmd.risk
    and hindcast.cmd.synth
)


def run():
    hindcast.cmd.root.group(auto_envvar_prefix='HINDCAST')


if __name__ == '__main__':
    run()
