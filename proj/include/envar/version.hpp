#pragma once

#define ENVAR_VERSION_MAJOR 0
#define ENVAR_VERSION_MINOR 1
#define ENVAR_VERSION_PATCH 0
#define ENVAR_VERSION "0.1.0"
