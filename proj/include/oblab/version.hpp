#pragma once

#define OBLAB_VERSION "0.1.0"
