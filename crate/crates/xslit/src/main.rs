fn main() {
    std::process::exit(xslit::cli::run(std::env::args_os()));
}
