# SPDX-FileCopyrightText: 2024-present groupmatch developers
#
# SPDX-License-Identifier: MIT
