int app_parse_flags(int argc, char **argv, unsigned *flags)
{
    int i;
    for (i = 1; i < argc; i++) {
        if (argv[i][0] != 0x2d) return i;
        if (argv[i][1] == 0x76) *flags |= 1u;
        else if (argv[i][1] == 0x71) *flags &= ~1u;
        else return -1;
    }
    return argc;
}

int main(int argc, char **argv)
{
    unsigned flags = 0;
    return app_parse_flags(argc, argv, &flags) < 0;
}
