# SPDX-FileCopyrightText: 2024-present groupmatch developers
#
# SPDX-License-Identifier: MIT
__version__ = "0.1.0"
